class ShopError(Exception):
    code = "shop_error"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail

    def to_dict(self):
        return {"code": self.code, "message": str(self), "detail": self.detail}


class NotFound(ShopError):
    code = "not_found"


class InvalidInput(ShopError):
    code = "invalid_input"

    def to_dict(self):
        data = super().to_dict()
        data["hint"] = "check the request body"
        return data

import os

DEFAULT_CURRENCY = "EUR"
MAX_PAGE_SIZE = 200


class Settings:
    def __init__(self, env=None):
        env = env or os.environ
        self.currency = env.get("SHOP_CURRENCY", DEFAULT_CURRENCY)
        self.page_size = int(env.get("SHOP_PAGE_SIZE", "50"))
        self.debug = env.get("SHOP_DEBUG", "0") == "1"

    def clamp_page(self, size):
        if size <= 0:
            return self.page_size
        return min(size, MAX_PAGE_SIZE)


def load_settings():
    return Settings()

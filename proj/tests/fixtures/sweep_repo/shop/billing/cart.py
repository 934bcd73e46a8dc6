from shop.core.money import Money
from shop.core.errors import InvalidInput


class CartLine:
    def __init__(self, product, quantity):
        if quantity <= 0:
            raise InvalidInput("quantity must be positive", detail=quantity)
        self.product = product
        self.quantity = quantity

    def total(self):
        return self.product.price.scale(self.quantity)


class Cart:
    def __init__(self, currency="EUR"):
        self.lines = []
        self.currency = currency

    def add(self, product, quantity=1):
        line = CartLine(product, quantity)
        self.lines.append(line)
        return line

    def total(self):
        amount = Money(0, self.currency)
        for line in self.lines:
            amount = amount.add(line.total())
        return amount

    def clear(self):
        self.lines = []

from shop.core.money import Money


class Product:
    def __init__(self, sku, name, price):
        self.sku = sku
        self.name = name
        self.price = price

    def describe(self):
        return "%s (%s): %s" % (self.name, self.sku, self.price)


class DigitalProduct(Product):
    def __init__(self, sku, name, price, url):
        super().__init__(sku, name, price)
        self.url = url

    def describe(self):
        return Product.describe(self) + " [download]"


def free_product(sku, name):
    return Product(sku, name, Money(0))

from shop.api.serializers import ProductSerializer, require_fields
from shop.catalog.repository import ProductRepository
from shop.catalog.search import build_index
from shop.billing.cart import Cart
from shop.billing.invoice import invoice_for, publish_invoice
from shop.core.errors import ShopError, NotFound
from shop.core.events import make_bus
from shop.core.config import load_settings


class Handler:
    def __init__(self, repository):
        self.repository = repository
        self.serializer = ProductSerializer()

    def handle(self, body):
        raise NotImplementedError


class GetProduct(Handler):
    def handle(self, body):
        require_fields(body, "sku")
        try:
            product = self.repository.find(body["sku"])
        except NotFound as exc:
            return 404, exc.to_dict()
        return 200, self.serializer.dump(product)


class SearchProducts(Handler):
    def handle(self, body):
        settings = load_settings()
        index = build_index(self.repository.store)
        skus = index.query(body.get("q", ""), settings.clamp_page(body.get("limit", 0)))
        products = [self.repository.find(sku) for sku in skus]
        return 200, self.serializer.dump_many(products)


class Checkout(Handler):
    def handle(self, body):
        require_fields(body, "items")
        cart = Cart()
        for item in body["items"]:
            cart.add(self.repository.find(item["sku"]), item.get("qty", 1))
        invoice = invoice_for(cart, body.get("promo"))
        publish_invoice(make_bus(), invoice)
        return 201, {"total": str(invoice.total())}


def dispatch(route, body, repository=None):
    repository = repository or ProductRepository()
    handlers = {"get": GetProduct, "search": SearchProducts, "checkout": Checkout}
    try:
        return handlers[route](repository).handle(body)
    except ShopError as exc:
        return 400, exc.to_dict()

class EventBus:
    def __init__(self):
        self._handlers = {}

    def subscribe(self, name, handler):
        self._handlers.setdefault(name, []).append(handler)

    def publish(self, name, payload):
        delivered = 0
        for handler in self._handlers.get(name, []):
            handler(payload)
            delivered += 1
        return delivered


def make_bus():
    return EventBus()

class UserService:
    def __init__(self, store):
        self.store = store

    def get_user(self, uid):
        return self.store.load(uid)

    def list_users(self, limit=50):
        rows = self.store.scan(prefix="u:", limit=limit)
        return [row for row in rows if row]

    def rename(self, uid, name):
        record = self.store.load(uid)
        record.name = name.strip().title()
        self.store.save(uid, record)
        return record

from module_a import ClassX


def main():
    obj = ClassX()
    print(obj.describe())

from hypothesis import settings


# the first numpy calls of a session easily exceed the default deadline
settings.register_profile('default', deadline=None, max_examples=200)
settings.load_profile('default')

"""Ann-functors between reduced Ann-categories and Mac Lane ring cohomology."""


def clear_caches():
    """Forget memoized subgroups and linear maps (useful for cold timings)."""
    from . import hochschild, maclane

    for mod in (maclane, hochschild):
        for obj in vars(mod).values():
            if hasattr(obj, "cache_clear") and getattr(obj, "__module__", None) == mod.__name__:
                obj.cache_clear()

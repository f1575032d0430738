"""Saddlepoint approximation of the Laplace transform of sums of dependent
lognormals: minimiser asymptotics, correction-factor estimators, and
Gaver-Stehfest density inversion."""

try:
    from . import _slnlap as _impl  # wheel layout: extension inside the package
except ImportError:
    import _slnlap as _impl  # in-tree layout: extension on PYTHONPATH

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
globals().update({name: getattr(_impl, name) for name in __all__})

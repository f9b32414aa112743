"""Field-independent certification of exceptional tree modules over tame quivers."""

__version__ = "0.1.0"

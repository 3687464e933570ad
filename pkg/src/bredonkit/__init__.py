"""Bredon cohomology and Mackey functor computations relative to families of finite subgroups."""

__version__ = "0.1.0"

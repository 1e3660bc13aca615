"""Exact arithmetic for quasi-periodic continued fractions and transcendence criteria."""

import sys

# convergent denominators routinely exceed the default 4300-digit str() limit
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__version__ = "0.1.0"

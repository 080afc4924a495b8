from .algscalar import AlgScalar
from .parser import parse_expr
from .poly import PolyQ, monomials_up_to
from .ratfn import RatFn

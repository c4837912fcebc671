# Core module: errors, dense helpers, schema and registry
from .errors import *
from .dense import DenseMatrix, as_dense
from .schema import *
from .registry import HeadRegistry

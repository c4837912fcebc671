from .bank_io import decode_bank, encode_bank, read_bank, write_bank
from .basis_io import read_basis, read_state, write_basis, write_state
from .synthetic import generate_stream, iter_stream, planted_basis

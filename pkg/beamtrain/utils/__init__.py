from .array import steering_vector, wrap_direction, beam_gain, kron, hadamard, as_codeword, planar_response
from .array import InvalidSizeError, InvalidArgumentError, UNIT_MODULUS_TOL
from .units import db_to_linear, linear_to_db, dbm_to_watts

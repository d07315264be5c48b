import math


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        return float('-inf')
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return db_to_linear(value_dbm - 30.0)

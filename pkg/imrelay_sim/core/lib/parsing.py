import math

from ..errors import ValidationError


def parse_float(raw: str, field: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"{field}: '{raw}' is not a number", field=field) from None
    if not math.isfinite(value):
        raise ValidationError(f"{field}: '{raw}' is not finite", field=field)
    return value


def parse_int(raw: str, field: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{field}: '{raw}' is not an integer", field=field) from None


def split_list(raw: str) -> list[str]:
    return [part.strip() for part in raw.replace(" ", ",").split(",") if part.strip()]


def parse_float_list(raw: str, field: str) -> list[float]:
    values = [parse_float(p, field) for p in split_list(raw)]
    if not values:
        raise ValidationError(f"{field}: empty list", field=field)
    return values


def parse_int_list(raw: str, field: str) -> list[int]:
    values = [parse_int(p, field) for p in split_list(raw)]
    if not values:
        raise ValidationError(f"{field}: empty list", field=field)
    return values


def parse_grid(raw: str, field: str) -> list[float]:
    """Parse `0,5,10` or an inclusive range `START:STEP:STOP` such as `0:5:40`."""
    if ":" not in raw:
        return parse_float_list(raw, field)
    parts = raw.split(":")
    if len(parts) != 3:
        raise ValidationError(f"{field}: range must be START:STEP:STOP, got '{raw}'", field=field)
    start, step, stop = (parse_float(p, field) for p in parts)
    if step <= 0 or stop < start:
        raise ValidationError(f"{field}: range needs step > 0 and stop >= start", field=field)
    count = math.floor((stop - start) / step + 1e-9) + 1
    # round() keeps 0:0.1:1 free of 0.30000000000000004 style noise
    return [round(start + i * step, 12) for i in range(count)]


def parse_choices(raw: str, field: str, allowed: frozenset[str]) -> list[str]:
    values = [p.lower() for p in split_list(raw)]
    if not values:
        raise ValidationError(f"{field}: empty list", field=field)
    unknown = [v for v in values if v not in allowed]
    if unknown:
        raise ValidationError(
            f"{field}: unknown value(s) {', '.join(unknown)}. valid: {', '.join(sorted(allowed))}", field=field
        )
    return values

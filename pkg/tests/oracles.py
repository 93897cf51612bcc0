"""Independent reference computations shared by the tests."""

import mpmath as mp


def mp_sinc_derivative(r, x):
    """f^(r)(x) in 150-digit arithmetic: series near 0, forward recurrence elsewhere."""
    with mp.workdps(150):
        x = mp.mpf(x)
        if abs(x) < 1:
            total, j = mp.mpf(0), r % 2
            while True:
                term = (-1) ** ((j + r) // 2) * x**j / (mp.factorial(j) * (j + r + 1))
                total += term
                if j > 10 and abs(term) < mp.mpf(10) ** -40:
                    return float(total)
                j += 2
        f = mp.sin(x) / x
        for k in range(1, r + 1):
            f = (mp.sin(x + k * mp.pi / 2) - k * f) / x
        return float(f)

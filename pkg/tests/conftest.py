import math
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

FIXTURE_DIR = ROOT / "fixtures"


def oracle_rank(mat, rows, cols):
    """Fraction-free Bareiss elimination over the integers; independent of the
    package's row-reduction path."""
    scaled = []
    for i in range(rows):
        den = 1
        for j in range(cols):
            den = den * Fraction(mat[i][j]).denominator // math.gcd(
                den, Fraction(mat[i][j]).denominator)
        scaled.append([int(Fraction(mat[i][j]) * den) for j in range(cols)])
    a = scaled
    rank = 0
    prev = 1
    pr = 0
    for col in range(cols):
        piv = None
        for r in range(pr, rows):
            if a[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        a[pr], a[piv] = a[piv], a[pr]
        for r in range(pr + 1, rows):
            for cc in range(col + 1, cols):
                a[r][cc] = (a[r][cc] * a[pr][col] - a[r][col] * a[pr][cc]) // prev
            a[r][col] = 0
        prev = a[pr][col]
        pr += 1
        rank += 1
        if pr == rows:
            break
    return rank

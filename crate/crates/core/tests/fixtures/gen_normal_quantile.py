"""Regenerate normal_quantile.txt: 50-digit reference values of the standard
normal quantile, obtained by root-finding on mpmath's erfc.

Grid (must match the Rust side):
  i / 100001           for i = 1..=100000
  k * 1e-6             for k = 1..=100
  1 - k * 1e-6         for k = 1..=100
"""
import mpmath as mp

mp.mp.dps = 50


def phi(z):
    return mp.erfc(-z / mp.sqrt(2)) / 2


def quantile(p):
    p = mp.mpf(p)
    guess = mp.sqrt(2) * mp.erfinv(2 * p - 1)
    return mp.findroot(lambda z: phi(z) - p, guess)


def grid():
    for i in range(1, 100001):
        yield i / 100001
    for k in range(1, 101):
        yield k * 1e-6
    for k in range(1, 101):
        yield 1 - k * 1e-6


with open("normal_quantile.txt", "w") as out:
    for p in grid():
        out.write(mp.nstr(quantile(p), 17, min_fixed=-1, max_fixed=1) + "\n")

#!/usr/bin/env python3
"""Independent DOF counter: enumerates skeleton nodes geometrically.

Each trace node is a point on the skeleton (vertices plus p-1 interior
points per edge). A node is constrained when it lies on Gamma:
t == 0 or x == 0 or x == L.
"""
import sys
from fractions import Fraction as Fr


def count(nx, nt, p, flux_order):
    L = T = Fr(1)
    hx, ht = L / nx, T / nt
    nodes = set()
    for i in range(nx + 1):
        for j in range(nt):  # vertical edges
            for k in range(p + 1):
                nodes.add((i * hx, j * ht + Fr(k, p) * ht))
    for i in range(nx):
        for j in range(nt + 1):  # horizontal edges
            for k in range(p + 1):
                nodes.add((i * hx + Fr(k, p) * hx, j * ht))
    on_gamma = [n for n in nodes if n[1] == 0 or n[0] == 0 or n[0] == L]
    u = nx * nt * p * p
    flux = (nx + 1) * nt * (flux_order + 1)
    trace = len(nodes)
    free = u + trace - len(on_gamma) + flux
    return dict(u=u, trace=trace, constrained=len(on_gamma), flux=flux, free=free)


if __name__ == "__main__":
    for nx, p, fo in [(1, 3, 2), (1, 3, 3), (2, 3, 2), (4, 3, 2), (2, 4, 3), (3, 5, 4)]:
        print(nx, p, fo, count(nx, nx, p, fo))

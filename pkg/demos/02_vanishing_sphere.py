"""Volumes of unit balls and the cubes that enclose them.

Run with ``python demos/02_vanishing_sphere.py``.
"""
from typicality.geometry import geometry_table

t = geometry_table(25)
print(" D   unit-ball volume   cube(2)/ball ratio")
for D, vol, ratio in zip(t["D"], t["sphere_volume"], t["cube_sphere_ratio"]):
    print(f"{D:3d}   {vol:14.6g}   {ratio:16.6g}")

peak = int(t["D"][t["sphere_volume"].argmax()])
print(f"\nThe unit ball is largest at D = {peak}; by D = 20 the enclosing cube is "
      f"{t['cube_sphere_ratio'][19]:.3g} times bigger.")

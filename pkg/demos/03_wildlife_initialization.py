"""Mammal initialization from sighting data and drift trajectories.

Fits kernel density estimates to the bundled sighting and dive-depth samples,
draws a population constrained to navigable water, and advances it with the
reflect-at-coastline drift model.
"""
from pathlib import Path

import numpy as np

from quietvoyage.geo import read_ascii_grid, read_mask, RegionMask, planar_distance_m
from quietvoyage.wildlife import init_population, kde_fit, kde_pdf, step_trajectory

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

grid = read_ascii_grid(FIXTURES / "bathymetry.asc")
lane = read_mask(FIXTURES / "lane_mask.asc", grid)
mask = RegionMask.from_grid(grid, lane)

sightings = np.loadtxt(FIXTURES / "sightings.csv", delimiter=",", skiprows=1)
depths = np.loadtxt(FIXTURES / "dive_depths.csv", delimiter=",", skiprows=1)
print(f"sightings: {sightings.shape[0]} points; dive depths: {depths.size} records")

pos_model = kde_fit(sightings)
depth_model = kde_fit(depths)
print(f"position KDE bandwidth (deg): {pos_model.bandwidth}")
print(f"depth KDE bandwidth (m): {depth_model.bandwidth[0]:.2f}")

mode = sightings.mean(axis=0)
print(f"density at the sighting centroid: {kde_pdf(pos_model, mode):.3f} per deg^2")

rng = np.random.default_rng(3)
pop = init_population(5, pos_model, depth_model, rng, grid, mask, min_depth_m=1.0)
print("\n=== Initialized population ===")
for m in pop:
    print(f"  mammal {m.id}: ({m.position.lat:.4f}, {m.position.lon:.4f}) "
          f"depth {m.position.depth:5.1f} m, drift {m.speed_kt:.2f} kt @ {m.heading_deg:6.1f} deg")

print("\n=== One hour of drift in 10-minute steps ===")
state = pop[0]
for step in range(6):
    nxt = step_trajectory(state, 1.0 / 6.0, grid, mask)
    moved = planar_distance_m(state.position, nxt.position)
    print(f"  t={10 * (step + 1):3d} min: ({nxt.position.lat:.4f}, {nxt.position.lon:.4f}) "
          f"moved {moved:6.1f} m heading {nxt.heading_deg:6.1f} deg")
    state = nxt

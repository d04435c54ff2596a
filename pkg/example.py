import numpy as np

from relativistic_heat import (
    BoundaryCondition,
    DiscreteForm,
    Grid,
    ModelParams,
    StationaryProblem,
    TimeStepConfig,
    evolve,
    shoot_1d,
    solve,
)
from relativistic_heat.features import verify
from relativistic_heat.features.initial_conditions import compact_bump

params = ModelParams(c=1.0)

# Stationary profile on [0, 1] with w(0) = 0, w(1) = -0.5
grid = Grid.uniform(200, 0.0, 1.0)
bc = BoundaryCondition.dirichlet_sides(grid, (0.0, -0.5))
solution = solve(StationaryProblem(grid, bc, form=DiscreteForm.FLUX), params)
reference = shoot_1d(0.0, -0.5, params)
error = np.abs(solution.w.values - reference.at(grid.centers(0))).max()
print("Newton iterations:", solution.iterations)
print("Max error against shooting: {:.2e}".format(error))

# A compactly supported bump spreads no faster than c
grid = Grid.uniform(400, -1.0, 1.0)
u0 = compact_bump(grid, amplitude=1.0, radius=0.2)
report = evolve(u0, BoundaryCondition.no_flux(), params, TimeStepConfig(t_end=0.5))
print("Front speed: {:.3f} (c = {})".format(verify.measure_front_speed(report), params.c))
print(report.to_frame().tail())

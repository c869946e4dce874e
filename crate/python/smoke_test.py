"""Smoke test for the pyprefopt extension module.

Build and install first, e.g. `pip install ./crates/python`, then run
`python python/smoke_test.py`.
"""

import json
import math

import pyprefopt as pp


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    # objectives and Jacobian shapes
    problem = pp.Problem.synthetic_concave(20)
    assert problem.dim == 20 and problem.num_objectives == 2
    theta0 = [0.05 * ((-1) ** i) for i in range(20)]
    f0 = problem.value(theta0)
    jac = problem.jacobian(theta0)
    assert len(f0) == 2 and len(jac) == 20 and len(jac[0]) == 2

    # ray preference on the diagonal, default double-loop solver
    pref = pp.Preference.pareto(2).with_ray([1.0, 1.0])
    assert pref.num_equalities == 1
    report = pp.run(problem, pref, theta0, pp.Solver.meta())
    assert report.iterations == 100
    assert report.h_l1 <= 1e-2, report
    assert pp.pf_distance_synthetic(report.objectives) <= 1e-2
    traj = report.trajectory()
    assert traj[0]["t"] == 0 and traj[-1]["t"] == 100
    assert report.trajectory_csv().splitlines()[0] == "t,f_1,f_2,norm_d,g_plus_l1,h_l1,kkt"

    # subproblem: orthogonal unit gradients give the midpoint direction
    sub = pp.solve_subproblem([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0], pp.Preference.pareto(2),
                              domain_name="simplified", max_iters=10_000, tol=1e-12)
    assert all(close(d, -0.5, 1e-8) for d in sub["direction"])
    assert close(sub["psi"], -0.25, 1e-8)

    # cones
    s5 = math.sqrt(5.0)
    a = pp.rays_to_halfspaces([[2 / s5, -1 / s5], [-1 / s5, 2 / s5]])
    assert sorted(round(x, 12) for row in a for x in row) == sorted(round(x, 12) for x in [1 / s5, 2 / s5, 2 / s5, 1 / s5])
    assert pp.dominates([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], [1.0, 1.0])
    assert pp.contains(a, [2.0, -1.0])
    b, off = pp.ray_to_equality([1.0, 1.0])
    assert close(b[0][0], 1 / math.sqrt(2)) and close(b[0][1], -1 / math.sqrt(2)) and off == [0.0]

    # metrics
    hv = pp.hypervolume([[0.2, 0.8], [0.5, 0.5], [0.8, 0.2]], [1.0, 1.0])
    assert close(hv, 0.37, 1e-12)
    kept = pp.nondominated_filter([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]])
    assert kept == [[0.0, 1.0], [1.0, 0.0]]

    # config-driven suite
    summary = json.loads(pp.run_config("""
[problem]
kind = "synthetic_concave"
q = 6
[preference]
kind = "uniform_rays"
count = 3
[solver]
iterations = 40
"""))
    assert len(summary["runs"]) == 3 and summary["hypervolume"] > 0.0

    # error mapping
    for bad in (lambda: pp.Preference([[1.0, 0.0]]), lambda: pp.run_config("[problem]\nkind = 'nope'\n")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        pp.run(problem, pp.Preference([[-1.0, 0.0], [0.0, -1.0]]), theta0, pp.Solver.meta())
    except ArithmeticError:
        pass
    else:
        raise AssertionError("expected ArithmeticError")

    print("pyprefopt smoke test passed")


if __name__ == "__main__":
    main()

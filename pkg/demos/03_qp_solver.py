"""Exercise the dense QP solver: certificates, warm starts, infeasibility.

Run:  python demos/03_qp_solver.py
"""

import numpy as np

from handretarget import QpProblem, solve, warm_start_solve

# a small box-constrained least-squares problem
H = np.array([[4.0, 1.0], [1.0, 3.0]])
g = np.array([-8.0, -6.0])
A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
b = np.array([1.0, 1.0, 0.0, 0.0])  # 0 <= x <= 1

p = QpProblem(H=H, g=g, A=A, b=b)
sol = solve(p)
print("minimizer:", sol.x)
print("active constraints:", sol.active_set, " duals:", np.round(sol.dual, 6))
print(f"kkt residual: {sol.kkt_residual:.2e}  iterations: {sol.iterations}")

# warm start: perturb g slightly and hand back the previous active set
p2 = QpProblem(H=H, g=g + [0.05, -0.02], A=A, b=b)
warm = warm_start_solve(p2, sol.active_set)
cold = solve(p2)
print(f"\nperturbed instance: warm iterations {warm.iterations} "
      f"vs cold {cold.iterations}; same x to {np.max(np.abs(warm.x - cold.x)):.1e}")

# an infeasible instance yields a Farkas certificate, not an exception
p3 = QpProblem(
    H=np.eye(1), g=np.zeros(1),
    A=np.array([[1.0], [-1.0]]), b=np.array([-2.0, -2.0]),  # x <= -2 and x >= 2
)
bad = solve(p3)
y = bad.certificate
print(f"\ninfeasible instance: status={bad.status.value}")
print(f"certificate y={y}: A'y = {float(p3.A.T @ y):.1e}, b'y = {float(p3.b @ y):.1f} < 0")

# every instance can be dumped for offline reproduction
print("\ndebug dump:", p3.to_json())

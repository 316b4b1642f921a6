"""Verifying the tensor engine's gradients.

The training loop relies on hand-written backward passes for every
layer kind.  This demo runs the finite-difference checker over a few
seeds per layer and prints the worst relative error observed — the same
machinery behind `restokit gradcheck --all`.

Run:  python3 demos/02_gradient_check.py
"""

from restokit.engine.gradcheck import run_suite


def main():
    results = run_suite(seeds=range(3))
    print(f"{'layer / loss':20s} {'max rel err':>12s}  status")
    for res in results:
        status = "ok" if res.passed else "FAIL"
        print(f"{res.label:20s} {res.max_error:12.3e}  {status}")
    worst = max(res.max_error for res in results)
    print(f"\nworst error across all checks: {worst:.3e} "
          f"(tolerance 1e-3)")


if __name__ == "__main__":
    main()

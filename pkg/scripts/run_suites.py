"""Run every verification suite at default sizes and report wall time."""

import time

from qcover.verify import SUITES, SuiteConfig, VerificationError, run_suite


def main() -> int:
    cfg = SuiteConfig()
    failed = 0
    for name in SUITES:
        t0 = time.perf_counter()
        try:
            msg = run_suite(name, cfg)
        except VerificationError as e:
            msg, failed = f"FAIL: {e}", failed + 1
        print(f"{name:<15} {time.perf_counter() - t0:7.2f} s  {msg}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())

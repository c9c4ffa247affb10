"""Write the five-bus case (descriptor, time series, simulation config) to a directory.

Run from the repository root:

    python -m utils.make_five_bus_case cases/five_bus --days 3
    opsim run cases/five_bus/simulation.json
"""

import argparse

from src.sequence.sequence import CHRONOLOGIES, INTER_PROBLEM
from src.system.cases import write_five_bus_case


def main() -> None:
    parser = argparse.ArgumentParser(description="Generate the five-bus test case")
    parser.add_argument("directory", help="Target directory")
    parser.add_argument("--days", type=int, default=3, help="Simulated days")
    parser.add_argument("--seed", type=int, default=7, help="Noise seed")
    parser.add_argument("--forecast-error", type=float, default=0.02, help="Relative forecast error")
    parser.add_argument("--realization-noise", type=float, default=0.01, help="Relative noise on actuals")
    parser.add_argument("--no-initial-conditions", action="store_true", help="Leave initial state out")
    parser.add_argument("--ed-horizon", type=int, default=2, help="ED look-ahead steps")
    parser.add_argument("--chronology", default=INTER_PROBLEM, choices=CHRONOLOGIES)
    parser.add_argument("--energy-target", action="store_true", help="Add the UC -> ED storage target")
    args = parser.parse_args()

    case = write_five_bus_case(
        args.directory,
        args.days,
        forecast_error=args.forecast_error,
        realization_noise=args.realization_noise,
        include_initial_conditions=not args.no_initial_conditions,
        seed=args.seed,
        ed_horizon=args.ed_horizon,
        chronology=args.chronology,
        energy_target=args.energy_target,
    )
    print(f"descriptor: {case.descriptor}")
    print(f"config:     {case.config}")


if __name__ == "__main__":
    main()

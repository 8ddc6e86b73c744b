"""
Be sure you have casimirpulse installed in you Virtual Env.
>>> pip install -Ue .

Runs every preset dark and lit, reporting crossovers and the modulation at
300 nm.
"""

import logging

import casimirpulse


def default_log_fn(name, light, crossover, modulation):
    state = "lit " if light else "dark"
    if crossover is None:
        where = "no sign change"
    else:
        where = "crossover at %.1f nm" % (crossover.separation * 1e9)
    print(
        name,
        state,
        where,
        " p_dark %.4g Pa p_lit %.4g Pa delta %.4g Pa"
        % (modulation.p_dark, modulation.p_lit, modulation.delta),
    )


class ScenarioRun:
    def __init__(self, database=None, temperature=300.0, separation=300e-9):
        self.database = database or casimirpulse.MaterialDatabase()
        self.temperature = temperature
        self.separation = separation

    def run_one(self, name, settings=casimirpulse.DEFAULT_SETTINGS, log_fn=default_log_fn):
        scenario = casimirpulse.build_scenario(name, self.database, self.temperature)
        modulation = casimirpulse.modulation_depth(scenario, self.separation, settings)
        for light in (False, True):
            crossover = casimirpulse.find_crossover(
                scenario.system(light), scenario.a_range, settings=settings
            )
            log_fn(name, light, crossover, modulation)

    def run_all(self, settings=casimirpulse.DEFAULT_SETTINGS, log_fn=default_log_fn):
        for name in casimirpulse.scenarios:
            self.run_one(name, settings, log_fn)


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    TOL = 1e-6
    ScenarioRun().run_all(casimirpulse.QuadratureSettings(rel_tol=TOL))

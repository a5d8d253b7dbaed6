from .runner import RunResult, TraceWriter, replay, simulate
from .scenario import Scenario, load_scenario, scenario_from_json, scenario_to_json
from .sessionlog import (LogCorruptionError, SessionLogWriter,
                         read_session_log)
from .statehash import state_hash
from .trajectory import (Circle, Oscillate, Recorded, Stand,
                         trajectory_from_json, trajectory_pose,
                         trajectory_to_json)

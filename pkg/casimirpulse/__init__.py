from ._version import __version__  # noqa: F401
from .constants import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
from .materials import *  # noqa: F401,F403
from .database import *  # noqa: F401,F403
from .lifshitz import *  # noqa: F401,F403
from .analysis import *  # noqa: F401,F403
from .presets import *  # noqa: F401,F403
from .testing import *  # noqa: F401,F403

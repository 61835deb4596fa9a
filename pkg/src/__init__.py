"""nugrass package"""

from . import cli
from . import config
from . import core
from . import geometry
from . import handlers
from . import utils

__version__ = "0.1.0"

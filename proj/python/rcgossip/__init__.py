"""Binary freshness of flat and clustered gossip networks under rate-changing gossip."""

from ._rcgossip import *  # noqa: F401,F403
from ._rcgossip import __version__  # noqa: F401

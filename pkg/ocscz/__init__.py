# Ownership and Copyright Information.
__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

from ocscz.util import assemble

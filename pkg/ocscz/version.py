__author__ = "ocscz developers"
__pkgname__ = "ocscz"
__version__ = "0.3.0"

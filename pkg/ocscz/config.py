""" Module providing a single class (GateConfig) that parses a config
file and provides the parameters required to build a gate simulation.
"""
import logging
import os
import re
import stat
from configparser import (
    DuplicateOptionError,
    DuplicateSectionError,
    MissingSectionHeaderError,
    ParsingError,
    RawConfigParser,
)

import ocscz.settings as ocs
from ocscz.exceptions import ConfigError


# Setup module level logging.
logger = logging.getLogger(__name__)


__author__ = "ocscz developers"
__copyright__ = "Copyright 2024, ocscz developers"
__license__ = "BSD-new"

_SECTION_RE = re.compile(r"^\s*\[([^\]]*)\]")
_OPTION_RE = re.compile(r"^\s*([^\s=:;#\[][^=:]*?)\s*[=:]")


def _locate(text, section, key=None):
    """ Return the 1-based line of section (or of key inside it) in text. """
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            current = match.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        match = _OPTION_RE.match(line)
        if match and current == section and match.group(1).strip().lower() == key:
            return lineno
    return None


class GateConfig:
    """ Class to create a RawConfigParser and read gate parameters
    from an ini file, on top of the base-point defaults.
    """

    def __init__(self, filename=ocs.default_filename):
        self._cfgfile = None
        # Prioritize local directory filename.
        if filename and os.path.exists(filename):
            self._cfgfile = filename
        elif filename and os.path.exists(os.path.join(os.path.expanduser("~"), filename)):
            self._cfgfile = os.path.join(os.path.expanduser("~"), filename)

        # create RawConfigParser holding the defaults, then lay the file over it.
        self._cfgparse = RawConfigParser()
        self._cfgparse.read_dict(ocs.defaults)

        if self._cfgfile:
            self._cfgfile = os.path.realpath(self._cfgfile)

            mode = stat.S_IMODE(os.stat(self._cfgfile)[stat.ST_MODE])
            if (mode & (stat.S_IWGRP | stat.S_IWOTH)) != 0:
                logger.warning("%s is writable by group or others.", self._cfgfile)

            with open(self._cfgfile, encoding="utf-8") as handle:
                self._read_text(handle.read())

        self._validate()
        logger.debug("config =\n%s", self.as_dict())

    @classmethod
    def from_dict(cls, values):
        """ Defaults overlaid with a nested dict of strings, as from as_dict(). """
        instance = cls(filename=None)
        for section, items in values.items():
            for key, value in items.items():
                if section not in ocs.defaults or key not in ocs.defaults[section]:
                    raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
                instance._cfgparse.set(section, key, str(value))
        instance._validate()
        return instance

    def _read_text(self, text):
        user = RawConfigParser(default_section="__none__", inline_comment_prefixes=(";",))
        try:
            user.read_string(text, source=self._cfgfile or "<string>")
        except MissingSectionHeaderError as e:
            raise ConfigError(
                f"line {e.lineno}: key outside of any [section]: {e.line.strip()!r}",
                lineno=e.lineno,
            ) from e
        except (DuplicateOptionError, DuplicateSectionError) as e:
            raise ConfigError(f"line {e.lineno}: {e.message}", lineno=e.lineno) from e
        except ParsingError as e:
            lineno, line = e.errors[0]
            raise ConfigError(
                f"line {lineno}: cannot parse {line.strip()!r}", lineno=lineno
            ) from e

        for section in user.sections():
            if section not in ocs.defaults:
                lineno = _locate(text, section)
                raise ConfigError(f"line {lineno}: unknown section [{section}]", lineno=lineno)
            for key, value in user.items(section):
                if key not in ocs.defaults[section]:
                    lineno = _locate(text, section, key)
                    raise ConfigError(
                        f"line {lineno}: unknown key {section}.{key}",
                        lineno=lineno,
                        key=f"{section}.{key}",
                    )
                self._cfgparse.set(section, key, value.strip())

    def _validate(self):
        for name, (low, high) in ocs.ranges.items():
            section, key = name.split(".")
            value = self._number(section, key)
            if (low is not None and value < low) or (high is not None and value > high):
                raise ConfigError(
                    f"{name} = {value} outside [{low}, {high if high is not None else 'inf'}]",
                    key=name,
                )
        for name, allowed in ocs.choices.items():
            section, key = name.split(".")
            value = self._cfgparse.get(section, key).lower()
            if value not in allowed:
                raise ConfigError(f"{name} = {value!r} not one of {allowed}", key=name)
        # Remaining numeric keys must at least parse.
        for section in ("qubit", "capnet"):
            for key in ocs.defaults[section]:
                self._number(section, key)
        if self.get_float("noise", "f_low_hz") >= self.get_float("noise", "f_high_hz"):
            raise ConfigError(
                "noise.f_low_hz must be below noise.f_high_hz", key="noise.f_low_hz"
            )

    def _number(self, section, key):
        raw = self._cfgparse.get(section, key)
        try:
            return float(raw)
        except ValueError:
            name = f"{section}.{key}"
            raise ConfigError(f"{name} = {raw!r} is not a number", key=name)

    def set(self, section, key, value):
        """ Override one key (used by sweeps) and re-validate. """
        if section not in ocs.defaults or key not in ocs.defaults[section]:
            raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
        self._cfgparse.set(section, key, str(value))
        self._validate()

    def get_config_filename(self):
        return self._cfgfile

    def get_config(self):
        return self._cfgparse

    def get(self, section, key):
        return self._cfgparse.get(section, key)

    def get_float(self, section, key):
        return self._number(section, key)

    def get_int(self, section, key):
        value = self._number(section, key)
        if value != int(value):
            raise ConfigError(f"{section}.{key} must be an integer", key=f"{section}.{key}")
        return int(value)

    def get_bool(self, section, key):
        return self._cfgparse.getboolean(section, key)

    def as_dict(self):
        """ Returns every section as a nested dict of strings. """
        return {s: dict(self._cfgparse.items(s)) for s in self._cfgparse.sections()}


def load_config(path=None):
    """ Parse path (which must exist) into a GateConfig; None gives the defaults. """
    if path is None:
        return GateConfig(filename=None)
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    return GateConfig(filename=path)

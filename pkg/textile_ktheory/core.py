"""Workbench: configuration, input files and the workflows behind the command line."""

import json
import os
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import appdirs
from dotenv import find_dotenv, load_dotenv
from pydantic import ValidationError

from .abelian import k0_of_pair, k1_of_pair, k_groups_textile
from .csds import count_words, from_symbolic_matrix, language
from .exceptions import ConfigurationError, NoSpecification, NotCommuting
from .models import (
    AnalysisReport,
    ExtensionReport,
    FgAbelianGroup,
    IntMatrix,
    KGroups,
    Specification,
    SymbolicMatrix,
    ValidityReport,
    WorkbenchConfig,
)
from .symbolic_matrix import (
    commutator_defect,
    find_specifications,
    from_integer_matrix,
    iter_specifications,
    load_int_matrix,
    load_symbolic_matrix,
    validate,
)
from .textile import (
    DiagonalWord,
    Patch,
    TextileSystem,
    analyze,
    build,
    from_commuting_matrices,
    onm_system,
    propagate_from_diagonal,
)

APP_NAME = "textile-ktheory"

# environment variable -> config field
ENV_OVERRIDES: Dict[str, str] = {
    "TEXTILE_KAPPA_LIMIT": "kappa_limit",
    "TEXTILE_COUNT_ONLY_THRESHOLD": "count_only_threshold",
    "TEXTILE_PREFIX_RHO": "prefix_rho",
    "TEXTILE_PREFIX_ETA": "prefix_eta",
    "TEXTILE_SVG_CELL_SIZE": "svg_cell_size",
}

PathLike = Union[str, Path]


def _is_symbolic(path: PathLike) -> bool:
    return Path(path).suffix == ".smx"


class Workbench:
    """Loads configuration and runs textile computations on matrix files."""

    def __init__(self, config_dir: Optional[Path] = None, env_file: Optional[Path] = None):
        """Initialize the workbench.

        Args:
            config_dir: Optional custom configuration directory
            env_file: Optional .env file; the default search applies when omitted

        Raises:
            ConfigurationError: If config.json or an environment override is invalid
        """
        if config_dir:
            self.config_dir = Path(config_dir)
        else:
            self.config_dir = Path(appdirs.user_config_dir(APP_NAME))
        self.config_dir.mkdir(parents=True, exist_ok=True)
        self.config_file = self.config_dir / "config.json"

        load_dotenv(dotenv_path=env_file or find_dotenv(usecwd=True))
        self._load_config()
        self._apply_environment()

    def _load_config(self) -> None:
        """Load configuration, creating the default file on first use."""
        if self.config_file.exists():
            try:
                with open(self.config_file, "r", encoding="utf-8") as f:
                    self.config = WorkbenchConfig(**json.load(f))
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"{self.config_file} is not valid JSON: {e}")
            except ValidationError as e:
                raise ConfigurationError(f"invalid configuration in {self.config_file}: {e}")
        else:
            self.config = WorkbenchConfig()
            self._save_config()

    def _save_config(self) -> None:
        with open(self.config_file, "w", encoding="utf-8") as f:
            json.dump(self.config.model_dump(), f, indent=2)

    def _apply_environment(self) -> None:
        updates = {
            field: os.environ[name] for name, field in ENV_OVERRIDES.items() if name in os.environ
        }
        if not updates:
            return
        try:
            self.config = WorkbenchConfig(**{**self.config.model_dump(), **updates})
        except ValidationError as e:
            raise ConfigurationError(f"invalid environment override: {e}")

    def update_config(self, **changes: object) -> WorkbenchConfig:
        """Validate and persist configuration changes.

        Raises:
            ConfigurationError: If a value is invalid
        """
        try:
            self.config = WorkbenchConfig(**{**self.config.model_dump(), **changes})
        except ValidationError as e:
            raise ConfigurationError(f"invalid configuration: {e}")
        self._save_config()
        return self.config

    def validate_file(self, path: PathLike) -> ValidityReport:
        return validate(load_symbolic_matrix(path))

    def symbolic_pair(
        self, a_path: PathLike, b_path: PathLike
    ) -> Tuple[SymbolicMatrix, SymbolicMatrix]:
        """Read two matrix files as symbolic matrices.

        Integer matrices are checked for commutation and labelled with the configured
        prefixes; .smx files are taken as they are.

        Raises:
            NotCommuting: If both inputs are integer matrices with AB != BA
        """
        if _is_symbolic(a_path) and _is_symbolic(b_path):
            return load_symbolic_matrix(a_path), load_symbolic_matrix(b_path)
        a, b = self.integer_pair(a_path, b_path)
        return (
            from_integer_matrix(a, self.config.prefix_rho),
            from_integer_matrix(b, self.config.prefix_eta),
        )

    def integer_pair(self, a_path: PathLike, b_path: PathLike) -> Tuple[IntMatrix, IntMatrix]:
        """Read two commuting integer matrices.

        Raises:
            NotCommuting: If AB != BA
        """
        a, b = load_int_matrix(a_path), load_int_matrix(b_path)
        if (a.rows, a.cols) == (b.rows, b.cols):
            defect = commutator_defect(a, b)
            if defect is not None:
                raise NotCommuting(*defect)
        return a, b

    def specifications(
        self, a_path: PathLike, b_path: PathLike, limit: Optional[int] = None
    ) -> List[Specification]:
        left, right = self.symbolic_pair(a_path, b_path)
        return find_specifications(left, right, limit or self.config.kappa_limit)

    def textile_system(self, a_path: PathLike, b_path: PathLike, which: int = 0) -> TextileSystem:
        """The textile system of the which-th specification of a pair of matrix files."""
        if not (_is_symbolic(a_path) and _is_symbolic(b_path)):
            a, b = self.integer_pair(a_path, b_path)
            return from_commuting_matrices(
                a, b, which, self.config.prefix_rho, self.config.prefix_eta
            )
        left, right = self.symbolic_pair(a_path, b_path)
        for index, kappa in enumerate(iter_specifications(left, right)):
            if index == which:
                return build(from_symbolic_matrix(left), from_symbolic_matrix(right), kappa)
        raise NoSpecification(f"no specification with index {which}")

    def diagonal(self, system: TextileSystem, indices: List[int]) -> DiagonalWord:
        """Diagonal word from indices into the tile listing."""
        if not indices:
            raise ValueError("the diagonal needs at least one tile")
        for index in indices:
            if not 0 <= index < len(system.tiles):
                raise ValueError(f"tile index {index} out of range 0..{len(system.tiles) - 1}")
        return DiagonalWord(tiles=tuple(system.tiles[index] for index in indices))

    def propagate(self, system: TextileSystem, indices: List[int], radius: int) -> Patch:
        return propagate_from_diagonal(system, self.diagonal(system, indices), radius)

    def analyze(self, system: TextileSystem) -> AnalysisReport:
        return analyze(system, self.config.square_depth)

    def k_groups(
        self, a_path: PathLike, b_path: PathLike
    ) -> Tuple[FgAbelianGroup, ExtensionReport]:
        """K0 and the K1 extension data of a commuting pair of integer matrices."""
        a, b = self.integer_pair(a_path, b_path)
        return k0_of_pair(a, b), k1_of_pair(a, b)

    def onm(self, n: int, m: int) -> KGroups:
        if n < 1 or m < 1:
            raise ValueError("loop counts must be positive")
        return k_groups_textile(onm_system(n, m), self.config.square_depth)

    def words(self, path: PathLike, length: int) -> Tuple[int, Optional[List[Tuple[str, ...]]]]:
        """Number of admissible words of a length, and the words when short enough to list."""
        if _is_symbolic(path):
            matrix = load_symbolic_matrix(path)
        else:
            matrix = from_integer_matrix(load_int_matrix(path), self.config.prefix_rho)
        system = from_symbolic_matrix(matrix)
        threshold = self.config.count_only_threshold
        if length > threshold:
            return count_words(system, length), None
        listed = language(system, length, materialize_limit=threshold)
        return len(listed), listed

"""
Configuration module for the DS separability certifier
Loads environment variables and provides centralized config access
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(override=True)


class Config:
    """Main configuration class: numerical tolerances and logging"""

    # Tolerance policy (see core.numerics.matcore.Tolerance)
    ABS_EIG = float(os.getenv('SEPCERT_ABS_EIG', 1e-9))
    REL_SCALE = float(os.getenv('SEPCERT_REL_SCALE', 1e-12))
    RANK_CUT = float(os.getenv('SEPCERT_RANK_CUT', 1e-9))

    # Logging
    LOG_LEVEL = os.getenv('SEPCERT_LOG_LEVEL', 'WARNING').upper()
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    @classmethod
    def validate(cls):
        """Validate that all config values are usable"""
        problems = []
        for key in ('ABS_EIG', 'REL_SCALE', 'RANK_CUT'):
            if not getattr(cls, key) > 0:
                problems.append(f"{key}={getattr(cls, key)} (must be > 0)")
        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            problems.append(f"LOG_LEVEL={cls.LOG_LEVEL}")
        problems.extend(SearchConfig.problems())

        if problems:
            raise ValueError(f"Invalid config values: {', '.join(problems)}")

        return True

    @classmethod
    def get_tolerance_config(cls):
        """Get keyword arguments for Tolerance"""
        return {
            'abs_eig': cls.ABS_EIG,
            'rel_scale': cls.REL_SCALE,
            'rank_cut': cls.RANK_CUT,
        }

    @classmethod
    def get_logging_config(cls):
        """Get logging.basicConfig keyword arguments"""
        return {
            'level': cls.LOG_LEVEL,
            'format': cls.LOG_FORMAT,
        }

    @classmethod
    def get_budget_config(cls):
        """Get keyword arguments for CertifyBudget"""
        return SearchConfig.as_dict()


class SearchConfig:
    """Budgets for the heuristic searches of the certify pipeline"""

    SEED = int(os.getenv('SEPCERT_SEED', 0))
    RESTARTS = int(os.getenv('SEPCERT_RESTARTS', 8))
    ITERS = int(os.getenv('SEPCERT_ITERS', 2000))

    # CP factorization inner dimension ceiling
    CP_MAX_K = int(os.getenv('SEPCERT_CP_MAX_K', 20))

    # Horn scan: principal 5-subsets before random sampling kicks in
    WITNESS_SUBSET_CAP = int(os.getenv('SEPCERT_WITNESS_SUBSET_CAP', 2000))

    # Range criterion: admissible supports
    SUPPORT_CAP = int(os.getenv('SEPCERT_SUPPORT_CAP', 2 ** 16))

    @classmethod
    def problems(cls):
        return [
            f"{key}={getattr(cls, key)} (must be >= 1)"
            for key in ('RESTARTS', 'ITERS', 'CP_MAX_K', 'WITNESS_SUBSET_CAP', 'SUPPORT_CAP')
            if getattr(cls, key) < 1
        ]

    @classmethod
    def as_dict(cls):
        return {
            'seed': cls.SEED,
            'restarts': cls.RESTARTS,
            'iters': cls.ITERS,
            'cp_max_k': cls.CP_MAX_K,
            'witness_subset_cap': cls.WITNESS_SUBSET_CAP,
            'support_cap': cls.SUPPORT_CAP,
        }


# Convenience instance
config = Config()


def load_config():
    """
    Load configuration for use in the CLI and other modules
    Returns a dictionary with all config sections
    """
    return {
        'tolerance': config.get_tolerance_config(),
        'budget': config.get_budget_config(),
        'logging': config.get_logging_config(),
    }

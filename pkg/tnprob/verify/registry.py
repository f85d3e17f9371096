"""Suite registry for verification plug-ins."""

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from tnprob.verify.base import BaseSuite


class SuiteRegistry:
    """
    Registry for verification suites.

    Suites self-register with a decorator and are looked up by name from the CLI.

    Example usage:
        @SuiteRegistry.register("thm1")
        class FullyDecoheredSuite(BaseSuite):
            ...

        suite = SuiteRegistry.create_instance("thm1", trials=50, seed=0)
    """

    _suites: dict[str, type["BaseSuite"]] = {}

    @classmethod
    def register(cls, name: str):  # type: ignore[no-untyped-def]
        """
        Decorator to register a suite class.

        Args:
            name: The unique suite name used on the command line (e.g., "thm1")

        Returns:
            Decorator function that registers the class
        """

        def decorator(suite_class: type["BaseSuite"]) -> type["BaseSuite"]:
            if name in cls._suites:
                raise ValueError(f"Suite '{name}' is already registered")
            suite_class.SUITE_NAME = name
            cls._suites[name] = suite_class
            return suite_class

        return decorator

    @classmethod
    def get(cls, name: str) -> type["BaseSuite"] | None:
        return cls._suites.get(name)

    @classmethod
    def get_all(cls) -> dict[str, type["BaseSuite"]]:
        return cls._suites.copy()

    @classmethod
    def get_names(cls) -> list[str]:
        """Registered suite names, in registration order."""
        return list(cls._suites.keys())

    @classmethod
    def create_instance(
        cls, name: str, trials: int | None = None, seed: int = 0, tolerance: float | None = None
    ) -> "BaseSuite | None":
        """
        Create a suite instance by name.

        Args:
            name: The suite name
            trials: Random trials to run (None for the suite's default)
            seed: Seed of the suite's random stream
            tolerance: Overrides the suite's default tolerance

        Returns:
            A new suite instance or None if the suite is not found
        """
        suite_class = cls.get(name)
        if suite_class:
            return suite_class(trials=trials, seed=seed, tolerance=tolerance)
        return None

    @classmethod
    def is_registered(cls, name: str) -> bool:
        return name in cls._suites

    @classmethod
    def clear(cls) -> None:
        """
        Clear all registered suites.

        This is mainly useful for testing.
        """
        cls._suites.clear()

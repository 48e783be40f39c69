"""All haloplan exceptions.

Each type of error has its own exception, but there is a tree of exception classes starting from
``HaloPlanException``, so it's easy to catch many exception types at once.

This module can be imported from haloplan: ``from haloplan import exceptions``.

"""

from typing import Any, Optional, Tuple


class HaloPlanException(Exception):
    """Default exception raised for all haloplan problems.

    Base: ``Exception``.
    """

    def __init__(self, message: str = "") -> None:
        """Init the exception.

        Parameters
        ----------
        message : str
            The exception message.

        """
        self.message = message

        super().__init__(message)


class DomainError(HaloPlanException, ValueError):
    """Exception raised when a value is outside of its domain.

    For example a negative index, a processor rank out of range, or a number of processors
    lower than 1.

    Bases: ``HaloPlanException, ValueError``.
    """


class IndexOverflowError(DomainError, OverflowError):
    """Exception raised when interval arithmetic leaves the allowed index space.

    Bases: ``DomainError, OverflowError``.
    """

    def __init__(self, value: int, limit: int) -> None:
        """Init the exception.

        Parameters
        ----------
        value : int
            The bound that was computed.
        limit : int
            The exclusive upper limit of the index space.

        """
        self.value = value
        self.limit = limit

        super().__init__(f"index bound {value} is outside of [0, {limit}]")


class InvariantError(HaloPlanException, AssertionError):
    """Exception raised by the check-mode when a postcondition does not hold.

    Bases: ``HaloPlanException, AssertionError``.
    """


class SignatureError(HaloPlanException, ValueError):
    """Exception related to the definition of a signature function.

    Bases: ``HaloPlanException, ValueError``.
    """


class MissingRowError(SignatureError, LookupError):
    """Exception raised when a sparse signature has no row for a requested output index.

    Bases: ``SignatureError, LookupError``.
    """

    def __init__(self, index: int, kernel_name: Optional[str] = None) -> None:
        """Init the exception.

        Parameters
        ----------
        index : int
            The output index without row.
        kernel_name : Optional[str]
            The name of the kernel using the signature, if known.

        """
        self.index = index
        self.kernel_name = kernel_name

        prefix = f"<{kernel_name}> " if kernel_name else ""
        super().__init__(f"{prefix}sparse signature has no row for output index {index}")


class KernelError(HaloPlanException):
    """Exception related to a kernel.

    Base: ``HaloPlanException``.
    """

    def __init__(self, kernel_name: str, message: str = "") -> None:
        """Init the exception.

        Parameters
        ----------
        kernel_name : str
            The name of the kernel for which this exception is raised.
        message : str
            The exception message.

        """
        self.kernel_name = kernel_name

        super().__init__(f"<{kernel_name}> {message}")


class InvalidKernelError(KernelError, ValueError):
    """Exception raised when a kernel is built from incompatible parts.

    Bases: ``KernelError, ValueError``.
    """


class UncoverableKernelError(KernelError):
    """Exception raised when an index needed by a processor is owned by no processor.

    Base: ``KernelError``.
    """

    def __init__(self, kernel_name: str, proc: Optional[int], index: int) -> None:
        """Init the exception.

        Parameters
        ----------
        proc : Optional[int]
            The processor needing the index. ``None`` when raised from the sequential executor.
        index : int
            The index that nobody owns.

        For the other parameters, see ``KernelError``.

        """
        self.proc = proc
        self.index = index

        needer = f"processor {proc}" if proc is not None else "the kernel"
        super().__init__(
            kernel_name, f"index {index} needed by {needer} is owned by no processor"
        )


class ProgramError(HaloPlanException, ValueError):
    """Exception raised when a program is not well-formed.

    Bases: ``HaloPlanException, ValueError``.
    """


class ProgramFileError(ProgramError):
    """Exception raised when a program file cannot be read, with the position of the problem.

    Base: ``ProgramError``.
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        pos: Optional[Tuple[int, int]] = None,
        from_exception: Optional[Exception] = None,
    ) -> None:
        """Init the exception.

        Parameters
        ----------
        message : str
            The exception message.
        field : Optional[str]
            Path of the faulty field in the document, like ``kernels[1].signature.offsets``.
        pos : Optional[Tuple[int, int]]
            Line and column of a syntax error.
        from_exception : Optional[Exception]
            The exception that may have triggered this one.

        """
        self.field = field
        self.pos = pos
        self.from_exception = from_exception

        final_message = message
        if field:
            final_message = f"[field={field}] {final_message}"
        if pos:
            final_message = f"[line={pos[0]}, col={pos[1]}] {final_message}"

        if isinstance(from_exception, HaloPlanException):
            final_message += (
                f" (Original exception: <{from_exception.__class__.__name__}> "
                f"{from_exception.message})"
            )
        elif from_exception:
            final_message += f" (Original exception: {str(from_exception)})"

        super().__init__(final_message)


class SimulationError(HaloPlanException):
    """Exception raised by the distributed simulator.

    Base: ``HaloPlanException``.
    """


class UnfilledSlotError(SimulationError):
    """Exception raised when a slot of a processor input buffer was never delivered.

    Base: ``SimulationError``.
    """

    def __init__(self, kernel_name: str, proc: int, index: int) -> None:
        """Init the exception.

        Parameters
        ----------
        kernel_name : str
            The kernel being simulated.
        proc : int
            The processor owning the buffer.
        index : int
            The index of the missing slot.

        """
        self.kernel_name = kernel_name
        self.proc = proc
        self.index = index

        super().__init__(
            f"<{kernel_name}> slot {index} of the buffer of processor {proc} was not filled"
        )


class SenderConflictError(SimulationError):
    """Exception raised when two senders deliver different values for the same slot.

    Base: ``SimulationError``.
    """

    def __init__(
        self, kernel_name: str, proc: int, index: int, values: Tuple[Any, Any]
    ) -> None:
        """Init the exception.

        Parameters
        ----------
        values : Tuple[Any, Any]
            The value already in the slot and the new one.

        For the other parameters, see ``UnfilledSlotError``.

        """
        self.kernel_name = kernel_name
        self.proc = proc
        self.index = index
        self.values = values

        super().__init__(
            f"<{kernel_name}> slot {index} of the buffer of processor {proc} received "
            f"{values[0]} and {values[1]}"
        )


class ReplicaMismatchError(SimulationError):
    """Exception raised when replicated copies of an index do not hold the same value.

    Base: ``SimulationError``.
    """

    def __init__(self, object_name: str, index: int, procs: Tuple[int, int]) -> None:
        """Init the exception.

        Parameters
        ----------
        object_name : str
            The name of the distributed object.
        index : int
            The replicated index.
        procs : Tuple[int, int]
            Two processors holding different values.

        """
        self.object_name = object_name
        self.index = index
        self.procs = procs

        super().__init__(
            f"copies of {object_name}[{index}] differ on processors {procs[0]} and {procs[1]}"
        )

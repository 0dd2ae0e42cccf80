class OrderMismatch(Exception):
    '''Raised when two tables or series disagree on the truncation order.'''
    pass


class DimensionMismatch(Exception):
    '''Raised when letters, vectors or maps disagree on their dimension.'''
    pass


class ResonanceError(Exception):
    '''Raised when a needed letter sum has a vanishing eigenvalue along v.'''
    pass


class UnknownLetter(Exception):
    '''Raised when a word uses a letter that has no mode in the problem.'''
    pass


class NotInLieAlgebra(Exception):
    '''Raised when a coefficient table fails the infinitesimal shuffle relations.'''
    pass


class NotACharacter(Exception):
    '''Raised when a coefficient table fails the shuffle relations of the group.'''
    pass


class HypothesisViolation(Exception):
    '''Raised when a problem breaks the eigen relations or the projector algebra.'''
    pass


class SingularTransformation(Exception):
    '''Raised when a change of variables is not invertible.'''
    pass


class UnsupportedGenerator(Exception):
    '''Raised when an operation is not available for the problem's generator kind.'''
    pass


class WordTooLong(Exception):
    '''Raised when nested quadrature is requested for more than four letters.'''
    pass


class ProblemFileError(Exception):
    '''Raised when a problem file cannot be read or is not a JSON document.'''
    pass

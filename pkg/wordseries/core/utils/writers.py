import csv
import json
from typing import TextIO

import numpy as np

from wordseries.core.models import CoefficientTable, Word, word_key
from wordseries.core.utils.constants import COMPONENT_SEPARATOR, EMPTY_WORD, LETTER_SEPARATOR


def format_word(word: Word) -> str:
    '''Serializes a word: letters joined by ";", components by ",", "e" for ∅.'''
    if not word:
        return EMPTY_WORD

    return LETTER_SEPARATOR.join(COMPONENT_SEPARATOR.join(str(a) for a in letter) for letter in word)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in (EMPTY_WORD, ''):
        return ()

    return tuple(
        tuple(int(component) for component in letter.split(COMPONENT_SEPARATOR))
        for letter in text.split(LETTER_SEPARATOR)
    )


def _number(value: float) -> str:
    return f'{float(value):.17g}'


def table_rows(table: CoefficientTable) -> list[tuple[str, str, str]]:
    '''Rows (word, re, im) in graded-lexicographic order of the words.'''
    return [
        (format_word(word), _number(table[word].real), _number(table[word].imag))
        for word in sorted(table.entries, key=word_key)
    ]


def write_table(table: CoefficientTable, stream: TextIO, fmt: str = 'csv'):
    rows = table_rows(table)

    if fmt == 'json':
        document = {
            'order': table.order,
            'd': table.dim,
            'entries': [{'word': word, 're': float(re), 'im': float(im)} for word, re, im in rows],
        }
        stream.write(json.dumps(document, indent=2) + '\n')
        return

    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(('word', 're', 'im'))
    writer.writerows(rows)


def write_trajectory(times: np.ndarray, averaged: np.ndarray, reference: np.ndarray, stream: TextIO, fmt: str = 'csv'):
    '''
    Writes the averaged-representation trajectory next to the direct reference.
    Components are written as re/im column pairs, followed by the pointwise error.
    '''
    errors = np.linalg.norm(averaged - reference, axis=1)
    dimension = averaged.shape[1]

    if fmt == 'json':
        document = [
            {
                't': float(t),
                'averaged': [[float(z.real), float(z.imag)] for z in averaged[row]],
                'direct': [[float(z.real), float(z.imag)] for z in reference[row]],
                'error': float(errors[row]),
            }
            for row, t in enumerate(times)
        ]
        stream.write(json.dumps(document, indent=2) + '\n')
        return

    header = ['t']
    for label in ('avg', 'ref'):
        for index in range(dimension):
            header += [f'{label}_{index}_re', f'{label}_{index}_im']
    header.append('error')

    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row, t in enumerate(times):
        values = [_number(t)]
        for trajectory in (averaged, reference):
            for z in trajectory[row]:
                values += [_number(z.real), _number(z.imag)]
        values.append(_number(errors[row]))
        writer.writerow(values)

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""C implementations of the hot kernels.

Semantics are defined by the pure backend in pure.py; the equivalence
test suite holds both to identical outputs. The matcher here resolves
failure transitions at build time into a dense next-state table, so the
scan loop is a single array lookup per input byte.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc
from libc.stdint cimport int32_t, uint8_t, uint64_t

BACKEND = "c"

cdef uint64_t FNV_OFFSET = 0xCBF29CE484222325ULL
cdef uint64_t FNV_PRIME = 0x100000001B3ULL


cdef inline uint64_t _fnv_update(uint64_t h, const uint8_t* data, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ data[i]) * FNV_PRIME
    return h


def fnv1a64(bytes data):
    """FNV-1a 64-bit hash of a byte string."""
    cdef const uint8_t* buf = data
    return _fnv_update(FNV_OFFSET, buf, len(data))


def ngram_feature_counts(str text, int ngram_min, int ngram_max,
                         bint word_unigrams, unsigned long long mask):
    """Hashed character n-gram and word unigram counts for one text."""
    cdef bytes raw = text.encode("utf-8")
    cdef const uint8_t* buf = raw
    cdef Py_ssize_t nbytes = len(raw)
    cdef dict counts = {}
    cdef Py_ssize_t* starts
    cdef Py_ssize_t nchars = 0, i, j
    cdef int n
    cdef uint64_t h, prefix_c, prefix_w
    cdef object key, prev

    # namespace prefixes: 'c' 0x00 and 'w' 0x00 folded into the hash state
    prefix_c = (FNV_OFFSET ^ 0x63u) * FNV_PRIME
    prefix_c = (prefix_c ^ 0x00u) * FNV_PRIME
    prefix_w = (FNV_OFFSET ^ 0x77u) * FNV_PRIME
    prefix_w = (prefix_w ^ 0x00u) * FNV_PRIME

    starts = <Py_ssize_t*> PyMem_Malloc((nbytes + 1) * sizeof(Py_ssize_t))
    if starts == NULL:
        raise MemoryError()
    try:
        for i in range(nbytes):
            if (buf[i] & 0xC0) != 0x80:  # not a UTF-8 continuation byte
                starts[nchars] = i
                nchars += 1
        starts[nchars] = nbytes

        for n in range(ngram_min, ngram_max + 1):
            for i in range(nchars - n + 1):
                h = _fnv_update(prefix_c, buf + starts[i], starts[i + n] - starts[i])
                key = <object> (h & mask)
                prev = counts.get(key)
                counts[key] = 1.0 if prev is None else (<double> prev) + 1.0

        if word_unigrams:
            # normalized text separates words with single U+0020 bytes, but
            # mirror str.split(): any ASCII whitespace splits, empties dropped
            i = 0
            while i <= nbytes:
                j = i
                while j < nbytes and not _is_space(buf[j]):
                    j += 1
                if j > i:
                    h = _fnv_update(prefix_w, buf + i, j - i)
                    key = <object> (h & mask)
                    prev = counts.get(key)
                    counts[key] = 1.0 if prev is None else (<double> prev) + 1.0
                i = j + 1
    finally:
        PyMem_Free(starts)
    return counts


cdef inline bint _is_space(uint8_t b) nogil:
    return b == 0x20 or b == 0x09 or b == 0x0A or b == 0x0B or b == 0x0C or b == 0x0D


cdef class PatternMatcher:
    """Multi-pattern substring matcher (Aho-Corasick over UTF-8 bytes)."""

    cdef int32_t* _delta      # n_states x 256 resolved transition table
    cdef int32_t* _best       # per-state best pattern priority (sentinel = none)
    cdef Py_ssize_t _n_states
    cdef int32_t _sentinel
    cdef readonly list terms

    def __cinit__(self):
        self._delta = NULL
        self._best = NULL

    def __init__(self, terms):
        for term in terms:
            if not term:
                raise ValueError("patterns must be non-empty")
        self.terms = sorted(set(terms), key=lambda t: (-len(t), t))
        self._build()

    def __dealloc__(self):
        PyMem_Free(self._delta)
        PyMem_Free(self._best)

    cdef _build(self):
        cdef list goto_dicts = [{}]
        cdef list best = [len(self.terms)]
        cdef list fail
        cdef Py_ssize_t state, nxt, child, fallback, n_states
        cdef int byte_val
        cdef object queue_item

        for priority, term in enumerate(self.terms):
            state = 0
            for b in term.encode("utf-8"):
                nxt = (<dict> goto_dicts[state]).get(b, -1)
                if nxt < 0:
                    nxt = len(goto_dicts)
                    (<dict> goto_dicts[state])[b] = nxt
                    goto_dicts.append({})
                    best.append(len(self.terms))
                state = nxt
            if priority < <Py_ssize_t> best[state]:
                best[state] = priority

        n_states = len(goto_dicts)
        fail = [0] * n_states
        queue = list((<dict> goto_dicts[0]).values())
        head = 0
        while head < len(queue):
            state = queue[head]
            head += 1
            if <Py_ssize_t> best[fail[state]] < <Py_ssize_t> best[state]:
                best[state] = best[fail[state]]
            for byte_key, child_obj in (<dict> goto_dicts[state]).items():
                child = child_obj
                fallback = fail[state]
                while fallback and byte_key not in (<dict> goto_dicts[fallback]):
                    fallback = fail[fallback]
                fail[child] = (<dict> goto_dicts[fallback]).get(byte_key, 0)
                if fail[child] == child:
                    fail[child] = 0
                queue.append(child)

        self._n_states = n_states
        self._sentinel = <int32_t> len(self.terms)
        self._delta = <int32_t*> PyMem_Malloc(n_states * 256 * sizeof(int32_t))
        self._best = <int32_t*> PyMem_Malloc(n_states * sizeof(int32_t))
        if self._delta == NULL or self._best == NULL:
            raise MemoryError()

        # resolve transitions in BFS order: delta[s][b] = child or delta[fail(s)][b]
        for byte_val in range(256):
            self._delta[byte_val] = (<dict> goto_dicts[0]).get(byte_val, 0)
        self._best[0] = <int32_t> (<Py_ssize_t> best[0])
        for state in queue:
            self._best[state] = <int32_t> (<Py_ssize_t> best[state])
            for byte_val in range(256):
                nxt = (<dict> goto_dicts[state]).get(byte_val, -1)
                if nxt >= 0:
                    self._delta[state * 256 + byte_val] = <int32_t> nxt
                else:
                    self._delta[state * 256 + byte_val] = self._delta[fail[state] * 256 + byte_val]

    def best_match(self, str text):
        cdef bytes raw = text.encode("utf-8")
        cdef const uint8_t* buf = raw
        cdef Py_ssize_t nbytes = len(raw), i
        cdef int32_t state = 0, found = self._sentinel
        cdef const int32_t* delta = self._delta
        cdef const int32_t* best = self._best
        with nogil:
            for i in range(nbytes):
                state = delta[state * 256 + buf[i]]
                if best[state] < found:
                    found = best[state]
                    if found == 0:
                        break
        return self.terms[found] if found < self._sentinel else None

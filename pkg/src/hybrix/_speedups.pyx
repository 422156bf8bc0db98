# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; same API and semantics as ``hybrix._purekernels``."""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef enum:
    OP_BOT = 0
    OP_VAR = 1
    OP_NEG = 2
    OP_AND = 3
    OP_DIA = 4
    OP_SAT = 5
    OP_SATT = 6
    OP_CONST = 7
    OP_EXISTS = 8


BACKEND = "cython"


def diamond_table(on_atoms, int k):
    cdef int64_t size = (<int64_t>1) << k
    cdef int64_t b, low
    cdef int bit
    cdef int64_t *atoms = <int64_t *>malloc(k * sizeof(int64_t) + 1)
    cdef int64_t *table = <int64_t *>malloc(size * sizeof(int64_t))
    if atoms == NULL or table == NULL:
        free(atoms)
        free(table)
        raise MemoryError()
    try:
        for bit in range(k):
            atoms[bit] = on_atoms[bit]
        table[0] = 0
        for b in range(1, size):
            low = b & -b
            bit = 0
            while (low >> bit) != 1:
                bit += 1
            table[b] = table[b ^ low] | atoms[bit]
        return [table[b] for b in range(size)]
    finally:
        free(atoms)
        free(table)


cdef struct Machine:
    int64_t *prog
    int proglen
    int64_t *dtable
    int64_t *attable
    int64_t top
    int64_t size
    int64_t *stack


cdef int64_t run(Machine *m, int64_t *vals) nogil:
    cdef int pc = 0
    cdef int sp = 0
    cdef int64_t op, a, x
    cdef int64_t *st = m.stack
    while pc < m.proglen:
        op = m.prog[pc]
        if op == OP_VAR:
            st[sp] = vals[m.prog[pc + 1]]
            sp += 1
        elif op == OP_NEG:
            st[sp - 1] = m.top ^ st[sp - 1]
        elif op == OP_AND:
            sp -= 1
            st[sp - 1] = st[sp - 1] & st[sp]
        elif op == OP_DIA:
            st[sp - 1] = m.dtable[st[sp - 1]]
        elif op == OP_BOT:
            st[sp] = 0
            sp += 1
        elif op == OP_CONST:
            st[sp] = m.prog[pc + 1]
            sp += 1
        elif op == OP_SAT:
            sp -= 1
            a = st[sp]
            x = st[sp - 1]
            st[sp - 1] = m.top if (x & ~a) == 0 else 0
        elif op == OP_SATT:
            sp -= 1
            a = st[sp]
            x = st[sp - 1]
            st[sp - 1] = m.attable[x * m.size + a]
        elif op == OP_EXISTS:
            st[sp - 1] = m.top if st[sp - 1] != 0 else 0
        pc += 2
    return st[sp - 1]


cdef int64_t *to_c(seq) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef int64_t *out = <int64_t *>malloc((n + 1) * sizeof(int64_t))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = seq[i]
    return out


cdef int validate(prog) except -1:
    cdef Py_ssize_t i
    for i in range(0, len(prog), 2):
        if not 0 <= prog[i] <= OP_EXISTS:
            raise ValueError(f"bad opcode {prog[i]}")
    return 0


cdef void setup(Machine *m, prog, int64_t *dtable, int64_t *attable, int64_t top, int64_t *stack):
    m.proglen = len(prog)
    m.dtable = dtable
    m.attable = attable
    m.top = top
    m.size = top + 1
    m.stack = stack


def evaluate(prog, vals, dtable, int64_t top, attable=None):
    validate(prog)
    cdef Machine m
    cdef int64_t *cprog = to_c(prog)
    cdef int64_t *cvals = to_c(vals)
    cdef int64_t *cd = to_c(dtable)
    cdef int64_t *cat = to_c(attable if attable is not None else ())
    cdef int64_t *stack = <int64_t *>malloc((len(prog) // 2 + 1) * sizeof(int64_t))
    try:
        setup(&m, prog, cd, cat, top, stack)
        m.prog = cprog
        return run(&m, cvals)
    finally:
        free(cprog)
        free(cvals)
        free(cd)
        free(cat)
        free(stack)


def find_falsifier(prog_l, prog_r, domains, dtable, int64_t top, attable=None):
    validate(prog_l)
    validate(prog_r)
    cdef int n = len(domains)
    cdef int i, pos
    for d in domains:
        if len(d) == 0:
            return None
    cdef Machine ml, mr
    cdef int64_t *pl = to_c(prog_l)
    cdef int64_t *pr = to_c(prog_r)
    cdef int64_t *cd = to_c(dtable)
    cdef int64_t *cat = to_c(attable if attable is not None else ())
    cdef int64_t *stack = <int64_t *>malloc((max(len(prog_l), len(prog_r)) // 2 + 1) * sizeof(int64_t))
    cdef int64_t *vals = <int64_t *>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t *idx = <int64_t *>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t *lens = <int64_t *>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t **doms = <int64_t **>malloc((n + 1) * sizeof(int64_t *))
    cdef bint found = False
    for i in range(n):
        doms[i] = NULL
    try:
        for i in range(n):
            doms[i] = to_c(domains[i])
            lens[i] = len(domains[i])
            idx[i] = 0
            vals[i] = doms[i][0]
        setup(&ml, prog_l, cd, cat, top, stack)
        ml.prog = pl
        setup(&mr, prog_r, cd, cat, top, stack)
        mr.prog = pr
        with nogil:
            while True:
                if run(&ml, vals) != run(&mr, vals):
                    found = True
                    break
                pos = n - 1
                while pos >= 0:
                    idx[pos] += 1
                    if idx[pos] < lens[pos]:
                        vals[pos] = doms[pos][idx[pos]]
                        break
                    idx[pos] = 0
                    vals[pos] = doms[pos][0]
                    pos -= 1
                if pos < 0:
                    break
        if found:
            return [vals[i] for i in range(n)]
        return None
    finally:
        for i in range(n):
            free(doms[i])
        free(doms)
        free(pl)
        free(pr)
        free(cd)
        free(cat)
        free(stack)
        free(vals)
        free(idx)
        free(lens)

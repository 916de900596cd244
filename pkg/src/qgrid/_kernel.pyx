# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled training loop over a dense, row-major Q array.

Mirrors ``qgrid.trainer._train_python`` operation for operation: same rng draw
order, same tie-breaking, same floating-point expression order.
"""

from cpython cimport array
import array as _array

from libc.math cimport INFINITY
from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t qg_next(uint64_t *s) {
        uint64_t z;
        *s += 0x9E3779B97F4A7C15ULL;
        z = *s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static inline double qg_unit_float(uint64_t *s) {
        return (double)(qg_next(s) >> 11) * (1.0 / 9007199254740992.0);
    }
    static inline uint64_t qg_int_below(uint64_t *s, uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t x = qg_next(s);
            if (x >= threshold) return x % n;
        }
    }
    """
    uint64_t qg_next(uint64_t *s) nogil
    double qg_unit_float(uint64_t *s) nogil
    uint64_t qg_int_below(uint64_t *s, uint64_t n) nogil


def train_dense(
    tuple extents,
    tuple start,
    tuple goal,
    tuple axis_steps,
    double goal_reward,
    double step_reward,
    double alpha,
    double gamma,
    double epsilon,
    Py_ssize_t num_episodes,
    Py_ssize_t max_steps,
    uint64_t seed,
    on_episode=None,
):
    """Run every episode; return ``(q, written, rewards, steps)``.

    ``q`` is an ``array('d')`` indexed ``state_index * num_actions + action``
    with row-major state indices; ``written`` flags entries the update touched.
    """
    cdef Py_ssize_t dim = len(extents)
    cdef Py_ssize_t n_actions = len(axis_steps)
    cdef Py_ssize_t i, a, ep, n, best_a
    cdef int64_t n_states = 1
    for i in range(dim):
        n_states *= <int64_t>extents[i]

    cdef array.array d_tmpl = _array.array("d")
    cdef array.array q_arr = array.clone(d_tmpl, n_states * n_actions, zero=True)
    cdef array.array rew_arr = array.clone(d_tmpl, num_episodes, zero=True)
    cdef array.array b_tmpl = _array.array("B")
    cdef array.array written_arr = array.clone(b_tmpl, n_states * n_actions, zero=True)
    cdef array.array q_tmpl = _array.array("q")
    cdef array.array steps_arr = array.clone(q_tmpl, num_episodes, zero=True)
    cdef array.array ext_arr = array.clone(q_tmpl, dim, zero=True)
    cdef array.array stride_arr = array.clone(q_tmpl, dim, zero=True)
    cdef array.array start_arr = array.clone(q_tmpl, dim, zero=True)
    cdef array.array cur_arr = array.clone(q_tmpl, dim, zero=True)
    cdef array.array axis_arr = array.clone(q_tmpl, n_actions, zero=True)
    cdef array.array sign_arr = array.clone(q_tmpl, n_actions, zero=True)

    cdef double[::1] q = q_arr
    cdef unsigned char[::1] written = written_arr
    cdef double[::1] rewards = rew_arr
    cdef long long[::1] steps = steps_arr
    cdef long long[::1] ext = ext_arr
    cdef long long[::1] stride = stride_arr
    cdef long long[::1] start_c = start_arr
    cdef long long[::1] cur = cur_arr
    cdef long long[::1] axis = axis_arr
    cdef long long[::1] sign = sign_arr

    # Row-major: the last axis varies fastest.
    cdef int64_t acc = 1
    for i in range(dim - 1, -1, -1):
        ext[i] = extents[i]
        stride[i] = acc
        acc *= ext[i]
    for a in range(n_actions):
        axis[a] = axis_steps[a][0]
        sign[a] = axis_steps[a][1]

    cdef int64_t start_idx = 0, goal_idx = 0
    for i in range(dim):
        start_c[i] = start[i]
        start_idx += start_c[i] * stride[i]
        goal_idx += <int64_t>goal[i] * stride[i]

    cdef uint64_t rng_state = seed
    cdef int64_t s, ns, base, nbase
    cdef long long c, ax
    cdef double total, r, best_q, m, old, target

    for ep in range(num_episodes):
        for i in range(dim):
            cur[i] = start_c[i]
        s = start_idx
        total = 0.0
        n = 0
        with nogil:
            while True:
                base = s * n_actions
                if qg_unit_float(&rng_state) < epsilon:
                    best_a = <Py_ssize_t>qg_int_below(&rng_state, <uint64_t>n_actions)
                else:
                    best_a = 0
                    best_q = -INFINITY
                    for a in range(n_actions):
                        if q[base + a] > best_q:
                            best_q = q[base + a]
                            best_a = a

                ax = axis[best_a]
                c = cur[ax] + sign[best_a]
                if 0 <= c < ext[ax]:
                    cur[ax] = c
                    ns = s + sign[best_a] * stride[ax]
                else:
                    ns = s

                if ns == goal_idx:
                    r = goal_reward
                else:
                    r = step_reward

                nbase = ns * n_actions
                m = q[nbase]
                for a in range(1, n_actions):
                    if q[nbase + a] > m:
                        m = q[nbase + a]
                target = r + gamma * m
                old = q[base + best_a]
                q[base + best_a] = old + alpha * (target - old)
                written[base + best_a] = 1

                total += r
                n += 1
                s = ns
                if ns == goal_idx or n == max_steps:
                    break
        rewards[ep] = total
        steps[ep] = n
        if on_episode is not None:
            on_episode(ep + 1, total, n)

    return q_arr, written_arr, rew_arr, steps_arr

# coding: utf-8

# # Congruence sieve on m
#
# For q = 3 and k = m, a solution gives u + d4*v = 3^m and H_p(u, v) = 1.
# Reducing modulo w leaves only some classes of m mod ord_w(3). These are the
# sets L(p, 3, w); intersecting over moduli of one order gives an A-set.

# In[1]:

from dioph.expected import recorded_strategies
from dioph.sieve import a_set, crt_min_nonzero, eliminate_prime, l_set, sweep, sweep_primes

# In[2]:

for w in (242, 866, 1417):
    s = l_set(1013, 3, w)
    print(w, s.order, sorted(s.classes))

# # A structural constraint
#
# Scaling (u, v) by 3^t multiplies H_p by 3^(t(p-1)), so whether s is in L
# depends only on s*(p-1) mod ord. For p = 2381 and ord 5 that product is
# always 0, so the A5 set is everything or nothing.

# In[3]:

print(sorted(a_set(2381, 5).classes))

# # CRT and elimination
#
# Combining A-sets of different orders through the CRT gives the smallest
# admissible m. If it exceeds the threshold of an exponent bound, p is
# excluded.

# In[4]:

rep = eliminate_prime(2741, (16, 27))
print(rep.as_dict())
print(crt_min_nonzero([a_set(2741, 16), a_set(2741, 27)]).r_m)

# # Sweep
#
# The recorded strategy is tried first. If it does not work, every combination
# of up to three A-sets is searched.

# In[5]:

reps = sweep(sweep_primes(1000, 1300), recorded_strategies(), workers=2)
for r in reps:
    print(r.p, r.strategy, r.m_lower, r.eliminated, "recorded" if r.recorded else "searched")

# coding: utf-8

# # Solutions of x^2 + q^(2m) = 2 y^p and their descent
#
# A solution is a tuple (x, q, m, y, p) with q an odd prime, p an odd prime and
# gcd(x, y) = 1. Over the Gaussian integers every solution comes from a pair
# (u, v) with y = u^2 + v^2 and (1+i)(u+iv)^p = F + iG, |F| = x, G = q^m.

# In[1]:

from dioph.descent import (
    SolutionTuple,
    classify_k,
    decompose,
    generate_large_solution,
    search_small,
    solve_fixed_y,
    verify_solution,
)
from dioph.hpoly import eval_FG

# Checking a tuple is plain integer arithmetic.

# In[2]:

t = SolutionTuple(x=545, q=3, m=3, y=53, p=3)
print(verify_solution(t), 545**2 + 3**6, 2 * 53**3)

# # Bounded search
#
# Every solution with q^m <= 501, p <= 50 and y <= 5000. y must be odd with
# all prime factors 1 mod 4, which keeps the scan to a second or so.

# In[3]:

small = search_small(501, 50, 5000)
for s in small:
    print(s.as_xyqmp())

# # Descent witnesses
#
# decompose returns the (u, v) pairs and the split u + d4*v = sign * q^k.
# k is always 0, m, or m - 1 (the last only when p = q).

# In[4]:

for s in (SolutionTuple(79, 3, 1, 5, 5), SolutionTuple(545, 3, 3, 53, 3)):
    for w in decompose(s):
        print(s.as_xyqmp(), w, classify_k(w, s.m, s.p, s.q).value, eval_FG(w.u, w.v, s.p))

# # Fixed y
#
# For y = 17 only q = 3 and q = 5 can occur with k = m, and the single solution
# up to p = 101 is 99^2 + 5^2 = 2 * 17^3.

# In[5]:

print([s.as_xyqmp() for s in solve_fixed_y(17)])

# # Large solutions from k = 0
#
# With u + d4*v = +-1 the value G_p(u, v) is often a large prime q, giving a
# solution with m = 1.

# In[6]:

for y, p in [(5, 29), (13, 101)]:
    for x, q, prime in generate_large_solution(y, p):
        print(y, p, len(str(q)), "digits, prime:", prime)

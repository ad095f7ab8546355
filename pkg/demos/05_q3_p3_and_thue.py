# coding: utf-8

# # The case q = p = 3
#
# Here u + v = +-3^k and the remaining values come from the recurrence
# r_0 = r_1 = 3, r_t = 4 r_(t-1) - r_(t-2).

# In[1]:

from dioph.descent import (
    q3_recurrence,
    recurrence_divisibility_classes,
    solve_q3_p3,
    thue_bounded_search,
)

# In[2]:

print(q3_recurrence(10).r)
print(recurrence_divisibility_classes(27), recurrence_divisibility_classes(17))
print(solve_q3_p3())

# # Bounded Thue search
#
# H_p(u, v) = +-1 is a Thue equation. Small v is scanned densely; beyond the
# root-gap bound only the neighbourhood of each real root is scanned. Hits with
# u + d4*v a power of 3 are flagged.

# In[3]:

for p in (5, 29):
    sols = thue_bounded_search(p, 1000)
    print(p, [(s.u, s.v, s.three_power) for s in sols])

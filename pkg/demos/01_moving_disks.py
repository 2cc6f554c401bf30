"""
Two disks on a collision course
===============================

Agents are disks of radius 0.5 moving at constant velocity between cell
centers, so two of them collide when their centers come closer than 1.
"""
import math

from waitrepair import MotionSegment, collision_window, first_collision

# A drives east along row 2, B drives south along column 2; both leave at t=0
a = MotionSegment.move((0, 2), (4, 2), 0.0, 1.0)
b = MotionSegment.move((2, 0), (2, 4), 0.0, 1.0)

w = collision_window(a, b, 1.0)
print("overlap window:", w)
print("closed form 2 - 1/sqrt(2) =", 2 - 1 / math.sqrt(2))

# if B starts 1.5 later they only get as close as 1.06
late = MotionSegment.move((2, 0), (2, 4), 1.5, 1.0)
print("B delayed by 1.5:", first_collision(a, late, 1.0))

# 1.4 is not enough
print("B delayed by 1.4:", first_collision(a, MotionSegment.move((2, 0), (2, 4), 1.4, 1.0), 1.0))

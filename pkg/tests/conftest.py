import math


def brute_force_indices(room, source, receiver, tau_max, speed, margin=4):
    """Independent enumeration oracle: plain loops over a generous cube."""
    radius = speed * tau_max
    bounds = [int(math.ceil(radius / L)) + 2 + margin for L in room.lengths]
    found = {}
    for kx in range(-bounds[0], bounds[0] + 1):
        for ky in range(-bounds[1], bounds[1] + 1):
            for kz in range(-bounds[2], bounds[2] + 1):
                dist_sq = 0.0
                for axis, k in enumerate((kx, ky, kz)):
                    pos = math.ceil(k / 2) * 2 * room.lengths[axis] + (-1) ** k * source[axis]
                    dist_sq += (pos - receiver[axis]) ** 2
                if math.sqrt(dist_sq) <= radius:
                    found[(kx, ky, kz)] = math.sqrt(dist_sq) / speed
    return found

//! Frozen steered-BRIEF sampling pattern: 256 point pairs `[x1, y1, x2, y2]`
//! inside a disk of radius 13. Regenerate with `generate_pattern(PATTERN_SEED)`.

#[rustfmt::skip]
pub(crate) const PATTERN: [[i8; 4]; 256] = [
    [0, -12, 10, 4], [-2, -6, 11, -4], [8, 9, 0, 10], [5, 12, 12, -5],
    [0, 12, 1, 6], [12, 0, 1, 2], [4, 6, -1, 9], [2, 8, -9, 0],
    [-3, -3, 8, -2], [-11, 4, 9, -1], [3, 0, 7, 10], [2, 3, -11, 3],
    [-2, 0, 6, -2], [-11, -1, -2, 1], [-3, 2, -2, -4], [-7, 9, -1, -1],
    [2, 4, -1, 6], [-5, 9, 3, -8], [-3, 3, -9, 1], [1, -12, -4, 11],
    [-11, -5, 4, 2], [0, 11, -10, -1], [-12, 0, 5, -3], [5, 2, -9, 3],
    [0, -3, 11, 1], [5, 7, 0, -9], [8, -3, 1, 1], [4, 12, -12, 0],
    [-9, -2, -6, -10], [4, 5, 5, 12], [6, 11, 8, 0], [5, 3, -11, -5],
    [5, -6, -10, -3], [-1, -10, -4, 10], [2, -3, -7, 5], [1, 3, 6, 4],
    [-4, -2, 6, -1], [13, 0, 5, -11], [4, 0, 5, -2], [-11, -5, -8, 0],
    [-3, 9, 11, -2], [5, -7, 9, 4], [5, -7, -8, 4], [12, 2, 6, 8],
    [-2, -4, -1, -4], [-5, 1, 0, 12], [5, 0, 8, 9], [-9, -1, -5, -11],
    [1, 7, -3, -5], [-1, 1, 3, 0], [-10, 5, 7, 2], [-2, 9, -2, -2],
    [3, 2, -8, -5], [5, -11, -1, -12], [6, -10, 0, 9], [8, 8, -8, 10],
    [1, 1, 2, 0], [3, -1, -5, 2], [11, 1, 10, -8], [-7, 10, -6, 1],
    [-3, 8, 13, 0], [4, 12, -8, -1], [-3, -11, 9, 2], [-7, -7, 1, 10],
    [5, 12, -3, 6], [8, 8, -3, -5], [5, -4, -2, -10], [8, -7, 7, -2],
    [-9, -2, 9, 5], [-10, -7, -1, 3], [-6, 7, 0, -6], [4, 12, 8, 4],
    [8, -7, 9, 8], [-3, 1, -4, -12], [0, 10, 6, -6], [5, 10, -6, -8],
    [-1, 5, 10, -3], [2, 12, 9, -9], [3, 4, 9, 9], [4, 6, -7, 2],
    [1, -4, 0, 8], [2, 10, -4, -5], [0, -4, 7, -8], [1, 1, -1, 7],
    [6, 10, -11, -6], [-4, 1, 3, 12], [10, 0, 4, 8], [4, -7, -5, 10],
    [7, -7, 6, 9], [6, 5, 0, 7], [-1, -9, -8, -5], [6, -8, 5, 10],
    [-3, 11, -5, 9], [-10, 7, 5, -8], [4, -2, 0, -10], [-6, -1, 4, 7],
    [6, -1, -9, 6], [-7, 0, 4, 11], [3, -10, -9, 1], [-6, 8, -9, -7],
    [-8, 2, 4, -1], [2, -1, -6, -5], [5, 0, -10, 1], [2, 3, -4, 1],
    [10, -7, -8, -5], [4, -4, 0, 8], [1, 3, 0, 11], [-9, 8, -13, 0],
    [9, 4, -1, 5], [-10, 2, -4, 10], [-1, 5, 3, -2], [-9, -9, 5, 12],
    [-1, 7, -6, -6], [-10, -6, 0, 9], [-5, 12, -4, -12], [-2, 8, -11, -1],
    [-12, 1, -7, 2], [2, 8, -9, 8], [-3, 11, 6, -1], [-4, -11, -4, -1],
    [1, -1, 4, -7], [11, 2, 0, 2], [7, -5, -1, -9], [8, 9, 10, 3],
    [-1, 4, -5, -12], [-7, 7, 12, -5], [5, 9, -10, 7], [-5, -3, 1, 3],
    [0, -2, -9, 2], [8, -5, -6, 8], [7, -3, -5, 10], [-2, 3, -1, -11],
    [3, 2, 0, -12], [-8, 4, 2, 0], [2, -1, 1, 7], [-7, -10, 11, -1],
    [-2, -3, 3, 1], [-10, 3, -2, 7], [3, 1, 4, -3], [-11, -4, 0, 6],
    [10, 7, 0, -1], [3, -11, 12, -1], [-5, -8, 10, -6], [4, -6, 2, -12],
    [-1, -3, -1, -5], [-10, -1, 6, -8], [-4, -2, 4, -10], [0, 2, 0, -10],
    [5, 6, -8, -10], [-2, -2, -9, -6], [2, -6, -3, 0], [-4, -11, 9, -7],
    [7, 10, 5, -8], [-2, 6, 1, 3], [-13, 0, 8, -5], [-4, 9, 8, 4],
    [7, -3, -7, 9], [-7, 5, -7, -5], [8, 3, -6, 1], [-3, 8, 5, -3],
    [-4, -4, -4, 8], [-12, 1, 2, -7], [-6, -4, -9, -1], [3, 8, 4, 12],
    [-7, 0, 10, -7], [-4, 0, 4, -6], [4, -4, -3, 2], [7, 4, 5, -12],
    [-8, -5, 6, 1], [-8, 0, 9, 2], [8, 3, 5, 0], [-12, 3, 1, 2],
    [-7, 7, 1, -4], [5, -3, -4, 12], [-2, -12, 7, 4], [0, -5, -10, -4],
    [2, 9, -10, -6], [7, 10, -2, 4], [0, -6, -8, -6], [4, 0, 1, 10],
    [-2, 1, -3, 3], [5, -7, 9, -4], [4, 4, -5, 2], [-1, -8, -8, 1],
    [6, -11, -10, -5], [-11, 5, 4, 3], [-4, -4, -5, -9], [-10, 3, -11, -2],
    [0, 0, -6, -4], [-6, -6, 5, 11], [-4, 9, 6, -8], [-4, -8, -5, -2],
    [1, -12, 4, 6], [-8, -10, 4, -7], [2, -6, 6, 6], [-6, -9, 2, 1],
    [7, 3, 10, -2], [-1, 11, 0, -13], [3, 6, 6, -4], [-1, -7, 1, -1],
    [4, 7, -7, 9], [8, 0, -1, -6], [-3, -7, -5, 3], [-1, 5, 6, -4],
    [4, 9, 10, 1], [-4, -6, -2, 6], [-5, -8, 0, -4], [-6, 9, -8, -1],
    [-1, 0, 5, 12], [7, -1, -1, -2], [5, -5, 1, 10], [-2, 1, 3, 1],
    [11, -5, 9, 0], [-4, -11, -6, 1], [2, -9, -12, -5], [-3, 9, -11, -4],
    [-2, 10, 7, 0], [-2, 12, -11, -5], [10, -4, -2, 1], [-4, 6, 10, 4],
    [8, 8, 10, 8], [-7, -7, 4, 4], [-9, 8, 9, -3], [-8, 2, -11, -4],
    [-9, -7, -3, 10], [5, -8, -1, 3], [-12, -1, 8, -2], [-6, 1, 2, -6],
    [0, 6, 1, -4], [-12, 2, 2, 10], [-1, 7, 2, 4], [8, -10, 10, 2],
    [6, 4, -9, -8], [9, -5, -9, -1], [3, 10, 11, 1], [-8, 4, -2, -3],
    [1, 11, 7, -7], [0, 5, 2, -9], [3, -9, 6, 3], [5, -12, 5, -5],
    [9, -8, 8, 2], [-7, -1, 3, -7], [5, 1, 11, -6], [-6, -9, 1, 12],
    [-3, 12, 11, -3], [2, 0, -1, -9], [10, -4, 10, -7], [9, 3, -5, -5],
    [3, 8, -10, 1], [6, 0, -1, -2], [6, -1, 10, -7], [6, -3, 10, 3],
    [7, -5, -5, 2], [-1, 2, -7, -3], [4, 7, -6, -5], [-7, 4, 12, 1],
];

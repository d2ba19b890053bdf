use std::ops::Range;

/// Splits `out` (row-major, `row_len` values per row) into up to `workers`
/// contiguous row blocks and runs `f(rows, block)` on each, one thread per
/// block. With one worker everything runs on the calling thread.
pub(crate) fn for_row_blocks<F>(out: &mut [f32], row_len: usize, workers: usize, f: F)
where
    F: Fn(Range<usize>, &mut [f32]) + Sync,
{
    let nrows = out.len().checked_div(row_len).unwrap_or(0);
    let workers = workers.clamp(1, nrows.max(1));
    if workers == 1 {
        f(0..nrows, out);
        return;
    }
    let per = nrows.div_ceil(workers);
    std::thread::scope(|scope| {
        for (b, block) in out.chunks_mut(per * row_len).enumerate() {
            let start = b * per;
            let rows = start..start + block.len() / row_len;
            let f = &f;
            scope.spawn(move || f(rows, block));
        }
    });
}

/// Row-range partition of `0..nrows` into up to `workers` blocks.
pub(crate) fn row_ranges(nrows: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.clamp(1, nrows.max(1));
    let per = nrows.div_ceil(workers).max(1);
    (0..nrows)
        .step_by(per)
        .map(|s| s..(s + per).min(nrows))
        .collect()
}

/// Maps `job` over `items` on scoped threads and returns results in input
/// order. The first error, in input order, wins.
pub(crate) fn map_ordered<I: Sync, T: Send>(
    items: &[I],
    job: impl Fn(&I) -> crate::Result<T> + Sync,
) -> crate::Result<Vec<T>> {
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len());
    let chunk = items.len().div_ceil(workers);
    let parts: Vec<crate::Result<Vec<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&job).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

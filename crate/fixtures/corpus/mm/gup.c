/*
 * get_user_pages_unlocked - pin user pages in memory without taking
 * mmap_sem manually. On success returns the number of pages pinned,
 * which may be fewer than requested; pages[0] through pages[ret-1]
 * then point at the pinned pages. On failure returns a negative errno
 * and no page is pinned.
 */
long get_user_pages_unlocked(unsigned long start, unsigned long nr_pages,
			     struct page **pages, unsigned int gup_flags)
{
	long ret;

	down_read(&current->mm->mmap_sem);
	ret = __gup_common(current, current->mm, start, nr_pages, pages,
			   NULL, gup_flags);
	up_read(&current->mm->mmap_sem);

	return ret;
}

/*
 * SCSI tape driver buffer handling.
 */

#include <linux/mm.h>
#include <linux/pagemap.h>

/* Pin down user pages and put them into a scatter gather list */
static int sgl_map_user_pages(struct scatterlist *sgl, const unsigned int max_pages,
			      unsigned long uaddr, size_t count, int rw)
{
	unsigned long end = (uaddr + count + PAGE_SIZE - 1) >> PAGE_SHIFT;
	unsigned long start = uaddr >> PAGE_SHIFT;
	const int nr_pages = end - start;
	int res, i, j;
	struct page **pages;

	/* User attempted overly large page requests */
	if (nr_pages > max_pages)
		return -ENOMEM;

	if (count == 0)
		return 0;

	if ((pages = kmalloc(max_pages * sizeof(*pages), GFP_KERNEL)) == NULL)
		return -ENOMEM;

	/* Try to fault in all of the necessary pages */
	res = get_user_pages_unlocked(uaddr, nr_pages, pages,
				      rw == READ ? FOLL_WRITE : 0);

	/* Errors and no page mapped should return here */
	if (res < nr_pages)
		goto out_unmap;

	for (i = 0; i < nr_pages; i++) {
		sg_set_page(&sgl[i], pages[i], 0, 0);
	}
	kfree(pages);
	return nr_pages;

 out_unmap:
	if (res > 0) {
		for (j = 0; j < res; j++)
			put_page(pages[j]);
		res = 0;
	}
	kfree(pages);
	return res;
}

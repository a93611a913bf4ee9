/*
 * 9P client request handling.
 */

#include <linux/errno.h>

/*
 * p9_check_errors - look for and decode an error response on a reply.
 * Returns 0 when the reply is not an error frame.
 */
static int p9_check_errors(struct p9_client *c, struct p9_req_t *req)
{
	int8_t type;
	int err;
	int ecode;

	type = req->rc->id;
	if (type != P9_RERROR && type != P9_RLERROR)
		return 0;

	err = p9pdu_readf(req->rc, c->proto_version, "d", &ecode);
	err = -ecode;
	p9_debug(P9_DEBUG_9P, "<<< RLERROR (%d)\n", -ecode);

	return err;
}

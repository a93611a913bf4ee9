/*
 * 9P protocol buffer marshalling.
 */

#include <linux/types.h>

static size_t pdu_read(struct p9_fcall *pdu, void *data, size_t size)
{
	size_t len = min(pdu->size - pdu->offset, size);

	memcpy(data, &pdu->sdata[pdu->offset], len);
	pdu->offset += len;
	return size - len;
}

/*
 * p9pdu_vreadf - unpack fields from a pdu according to a scanf-style
 * format string, stopping at the first short read. Fields after the
 * failure point are left untouched.
 */
static int p9pdu_vreadf(struct p9_fcall *pdu, int proto_version,
			const char *fmt, va_list ap)
{
	const char *ptr;
	int errcode = 0;

	for (ptr = fmt; *ptr; ptr++) {
		switch (*ptr) {
		case 'b': {
			int8_t *val = va_arg(ap, int8_t *);
			if (pdu_read(pdu, val, sizeof(*val))) {
				errcode = -EFAULT;
				break;
			}
		} break;
		case 'd': {
			int32_t *val = va_arg(ap, int32_t *);
			__le32 le_val;
			if (pdu_read(pdu, &le_val, sizeof(le_val))) {
				errcode = -EFAULT;
				break;
			}
			*val = le32_to_cpu(le_val);
		} break;
		default:
			break;
		}
		if (errcode)
			break;
	}

	return errcode;
}

int p9pdu_readf(struct p9_fcall *pdu, int proto_version, const char *fmt, ...)
{
	va_list ap;
	int ret;

	va_start(ap, fmt);
	ret = p9pdu_vreadf(pdu, proto_version, fmt, ap);
	va_end(ap);

	return ret;
}
